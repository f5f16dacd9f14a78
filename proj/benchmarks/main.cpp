#include <benchmark/benchmark.h>

// Own main: the packaged benchmark_main archive carries LTO bytecode from
// another compiler release.
BENCHMARK_MAIN();
