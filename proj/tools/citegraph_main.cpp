#include "citegraph/cli.hpp"

int main(int argc, char** argv) { return citegraph::cli::run(argc, argv); }
