// Builds the amalgamated Catch2 framework (including its default main) once.
#include <catch2/catch_amalgamated.cpp>
