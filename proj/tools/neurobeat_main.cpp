#include "neurobeat/cli.hpp"

int main(int argc, char** argv) { return neurobeat::run_command(argc, argv); }
