#include "cli_main.hpp"

int main(int argc, char** argv) { return decim::app::cli_main(argc, argv); }
