#ifndef CITYMORPH_CITYMORPH_HPP
#define CITYMORPH_CITYMORPH_HPP

#include "citymorph/bearings.hpp"
#include "citymorph/clustering.hpp"
#include "citymorph/error.hpp"
#include "citymorph/features.hpp"
#include "citymorph/geo.hpp"
#include "citymorph/geometry.hpp"
#include "citymorph/graph.hpp"
#include "citymorph/io.hpp"
#include "citymorph/pipeline.hpp"
#include "citymorph/polygon.hpp"
#include "citymorph/random.hpp"
#include "citymorph/reduction.hpp"
#include "citymorph/synth.hpp"
#include "citymorph/topology.hpp"

#endif  // CITYMORPH_CITYMORPH_HPP
