#include "xfield/cli.hpp"

int main(int argc, char** argv) { return xf::cli_main(argc, argv); }
