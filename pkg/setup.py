from setuptools import find_packages, setup

setup(
    name="pyinformed",
    version=open("VERSION").read().strip(),
    description="RRT* and Informed RRT* with direct sampling of the informed set, oracles and benchmarks",
    long_description=open("README.md").read().strip(),
    packages=find_packages(exclude=["tests"]),
    install_requires=["numpy", "scipy", "matplotlib", "PyYAML"],
    entry_points={"console_scripts": ["pyinformed=pyinformed.cli:main"]},
    test_suite="tests",
)
