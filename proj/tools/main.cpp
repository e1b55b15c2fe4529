#include "qsst/harness.hpp"

int main(int argc, char** argv) { return qsst::run_cli(argc, argv); }
