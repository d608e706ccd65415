#include "vsaxmc/cli.hpp"

int main(int argc, char** argv) { return vsaxmc::cli::run(argc, argv); }
