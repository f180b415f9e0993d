#include "stord/cli.hpp"

int main(int argc, char** argv) { return stord::cli::run(argc, argv); }
