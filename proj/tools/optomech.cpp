#include "optomech/io/cli.hpp"

int main(int argc, char** argv) { return optomech::io::run(argc, argv); }
