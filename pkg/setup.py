from setuptools import find_packages, setup

with open("requirements.txt") as fp:
    install_requires = [line for line in fp.read().strip().split("\n") if not line.startswith("pytest")]

setup(
    name="qudit-qft-pulses",
    version="0.1.0",
    packages=find_packages(include=["app", "app.*"]),
    install_requires=install_requires,
    python_requires=">=3.10",
    entry_points={"console_scripts": ["qftpulse=app.main:main"]},
)
