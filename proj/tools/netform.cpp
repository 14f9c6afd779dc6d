#include "netform_app.hpp"

int main(int argc, char** argv) { return netform::cli::run(argc, argv); }
