#include "subriem/cli.hpp"

int main(int argc, char** argv) { return subriem::run(argc, argv); }
