#include "mixw2/cli.hpp"

int main(int argc, char** argv) { return mixw2::cli::run(argc, argv); }
