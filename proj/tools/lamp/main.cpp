#include "lamp/cli.hpp"

int main(int argc, char** argv) { return lamp::cli::run(argc, argv); }
