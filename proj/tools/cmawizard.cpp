#include "cmawiz/cli.hpp"

int main(int argc, char** argv) { return cmawiz::cli_main(argc, argv); }
