#include "iqmimo/harness.hpp"

int main(int argc, char** argv) { return iqmimo::run_cli(argc, argv); }
