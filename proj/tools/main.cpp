#include "spintemp/cli_io.hpp"

int main(int argc, char** argv) { return spintemp::cli_main(argc, argv); }
