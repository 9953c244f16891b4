#include "cli.hpp"

int main(int argc, char** argv) { return fogcache::cli::run(argc, argv); }
