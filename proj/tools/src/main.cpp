#include "bubbleband/cli.hpp"

int main(int argc, char** argv) { return bubbleband::main_cli(argc, argv); }
