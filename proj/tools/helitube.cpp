#include "helitube/cli.hpp"

int main(int argc, char** argv) { return helitube::cli::run(argc, argv); }
