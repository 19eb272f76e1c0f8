#include "clup/cli.hpp"

int main(int argc, char** argv) { return clup::cli_main(argc, argv); }
