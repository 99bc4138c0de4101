#pragma once

#include <string>

#include "star/ensemble.hpp"
#include "star/geo.hpp"
#include "star/model.hpp"

namespace star {

// Versioned binary container ("SKCP"); headers are deterministic JSON so a
// save -> load -> save cycle is byte-identical.
void save_star_model(const std::string& path, StarModel& m);
StarModel load_star_model(const std::string& path);

void save_geo(const std::string& path, const GeoEmbeddings& g);
GeoEmbeddings load_geo(const std::string& path);

void save_alpha(const std::string& path, AlphaParams& p, int hidden);
AlphaParams load_alpha(const std::string& path);

// FNV-1a over the raw parameter bytes, for frozen-base guarantees.
uint64_t params_checksum(const std::vector<ad::ParamRef>& refs);
uint64_t geo_checksum(const GeoEmbeddings& g);

}  // namespace star
