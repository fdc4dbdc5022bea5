#include "cli.hpp"

int main(int argc, char** argv) { return pdl::cli_main(argc, argv); }
