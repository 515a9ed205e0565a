#include "edg/config.hpp"

int main(int argc, char** argv) { return edg::cli_main(argc, argv); }
