#include "crlfscan/cli.hpp"

int main(int argc, char** argv) { return crlfscan::cli_main(argc, argv); }
