import setuptools

with open("README.md", "r") as fh:
    long_description = fh.read()

setuptools.setup(
    name="pulsemetro",
    version="0.1.0",
    author="Tom Elliott",
    author_email="tom.elliott@nyu.edu",
    description="Gaussian-moment simulation and quantum Fisher information for pulse-kicked optomechanical resonators",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=setuptools.find_packages(exclude=["tests"]),
    classifiers=[
        "Programming Language :: Python :: 3.10.2",
        "License :: OSI Approved :: GNU Affero General Public License v3",
        "Operating System :: OS Independent",
    ],
    install_requires=[
        "airtight",
        "jsonpickle",
        "numpy",
        "python-slugify",
        "regex",
        "rich",
        "scipy",
        "textnorm",
    ],
    python_requires=">=3.10.2",
)
