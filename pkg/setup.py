import io
import os
import shutil

from setuptools import find_packages, setup, Command


PACKAGE_NAME = 'rangeinvar'
PACKAGE_VERSION = '0.9.0'
PACKAGE_ROOT = os.path.dirname(os.path.abspath(__file__))


# Tests run from the source checkout layout
if os.path.exists(os.path.join(PACKAGE_ROOT, 'tests')):
    test_suite = 'tests.make_suite'
else:
    test_suite = None


class CleanCommand(Command):
    user_options = [
        ('all', 'a', '(Compatibility with original clean command)'),
    ]

    def initialize_options(self):
        self.all = False

    def finalize_options(self):
        pass

    def run(self):
        sub_folders = ['build', 'temp', 'output', '%s.egg-info' % PACKAGE_NAME]
        if self.all:
            sub_folders.append('dist')
        for sub_folder in sub_folders:
            full_path = os.path.join(PACKAGE_ROOT, sub_folder)
            if os.path.exists(full_path):
                shutil.rmtree(full_path)
        for root, dirs, files in os.walk(os.path.join(PACKAGE_ROOT, PACKAGE_NAME)):
            for filename in files:
                if filename[-4:] == '.pyc':
                    os.unlink(os.path.join(root, filename))
            for dirname in list(dirs):
                if dirname == '__pycache__':
                    shutil.rmtree(os.path.join(root, dirname))


with io.open(os.path.join(PACKAGE_ROOT, 'readme.md'), 'r', encoding='utf-8') as f:
    readme = f.read()


setup(
    name=PACKAGE_NAME,
    version=PACKAGE_VERSION,

    description=(
        'Frozen Newton, Newton and variational solvers for coefficient '
        'identification problems whose forward map is range invariant, '
        'with finite element discretizations and an audit suite'
    ),
    long_description=readme,
    long_description_content_type='text/markdown',

    license='MIT',

    classifiers=[
        'Development Status :: 4 - Beta',

        'Intended Audience :: Science/Research',

        'License :: OSI Approved :: MIT License',

        'Programming Language :: Python :: 3',
        'Programming Language :: Python :: 3.8',
        'Programming Language :: Python :: 3.9',
        'Programming Language :: Python :: 3.10',
        'Programming Language :: Python :: 3.11',
        'Programming Language :: Python :: 3.12',

        'Topic :: Scientific/Engineering :: Mathematics',
    ],

    keywords='inverse problems regularization newton pde parameter identification',

    python_requires='>=3.8',
    install_requires=['numpy>=1.17', 'scipy>=1.4'],

    packages=find_packages(exclude=['tests*', 'dev*']),

    test_suite=test_suite,

    entry_points={
        'console_scripts': [
            'rangeinvar=rangeinvar.cli:main',
        ],
    },

    cmdclass={
        'clean': CleanCommand,
    }
)
