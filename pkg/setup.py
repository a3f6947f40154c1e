import setuptools

setuptools.setup(
    name="clbench",
    version="1.0.0",
    packages=setuptools.find_packages(exclude=["test"]),
    python_requires=">=3.10",
    install_requires=["numpy", "scipy", "matplotlib", "progressbar2", "tabulate"],
    license="MIT",
    author="The clbench developers",
    description=(
        "Closed-loop benchmark of visual-inertial pose estimators "
        "driving a simulated differential-drive robot."
    ),
)
