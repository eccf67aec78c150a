#ifndef KISAN_HPP
#define KISAN_HPP

#include <kisan/core.hpp>
#include <kisan/tree.hpp>
#include <kisan/forest.hpp>
#include <kisan/baselines.hpp>
#include <kisan/metrics.hpp>
#include <kisan/forecast.hpp>
#include <kisan/advisory.hpp>
#include <kisan/io.hpp>
#include <kisan/synth.hpp>
#include <kisan/bundle.hpp>
#include <kisan/benchmark.hpp>
#include <kisan/service.hpp>
#include <kisan/cli.hpp>

#endif  // KISAN_HPP
