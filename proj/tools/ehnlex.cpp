#include "commands.hpp"

int main(int argc, char** argv) { return ehn::cli::run(argc, argv); }
