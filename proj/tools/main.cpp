#include "confront/cli.hpp"

int main(int argc, char** argv) { return confront::run(argc, argv); }
