#include "crossdyn/cli.hpp"

int main(int argc, char** argv) { return crossdyn::cli::run(argc, argv); }
