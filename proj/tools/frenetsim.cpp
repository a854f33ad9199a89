#include "frenetsim/cli.hpp"

int main(int argc, char** argv) { return frenetsim::cli::run(argc, argv); }
