from setuptools import setup, find_packages

setup(
    name="roughint",
    version="1.0.0",
    packages=find_packages(exclude=["tests", "tests.*"]),
    install_requires=[
        "numpy",
        "scipy",
        "pandas",
        "pydantic>=2.0.0",
        "pydantic-settings>=2.0.0",
        "PyYAML",
        "python-dotenv",
        "rich",
    ],
    entry_points={"console_scripts": ["roughint=src.main:main"]},
    author="roughint Team",
    description="Rough-path integrals, rough differential equations and Wong-Zakai studies via fractional calculus",
    long_description=open("README.md").read(),
    long_description_content_type="text/markdown",
    python_requires=">=3.9",
)
