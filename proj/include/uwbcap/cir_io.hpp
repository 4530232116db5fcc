#pragma once

#include <string>
#include <vector>

#include "uwbcap/cluster_model.hpp"

namespace uwbcap {

// Text interchange format for channel realizations, version tag "cirv1":
//
//   #cirv1 ds=<seconds> n=<count>
//   #i=<index>
//   <time_s>,<re>,<im>
//   ...
//
// Each tap line is a complex weight at a time in [0, ds], strictly increasing
// within a record; a tap's squared magnitude is its energy share. UTF-8, LF.

/// Parse a CIR file and resample each record onto a dense grid with the given
/// step: tap weights land on the nearest grid sample, the response is
/// truncated to the declared delay spread and normalized to unit energy.
std::vector<CirRecord> load_cir_file(const std::string& path, double grid_step);

/// Write records (which must share one delay spread) as a CIR file; every
/// nonzero grid sample becomes one tap line. Round-trips through
/// load_cir_file with the same grid step.
void save_cir_file(const std::string& path, const std::vector<CirRecord>& records);

}  // namespace uwbcap
