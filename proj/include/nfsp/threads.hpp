#pragma once

#include <algorithm>
#include <cstdlib>
#include <string>

namespace nfsp {

// Worker threads for fan-out work (matches, per-player best responses),
// taken from NFSP_THREADS. Results never depend on this value.
inline int WorkerThreads() {
  const char* env = std::getenv("NFSP_THREADS");
  if (env == nullptr) return 1;
  try {
    return std::max(1, std::stoi(env));
  } catch (const std::exception&) {
    return 1;
  }
}

}  // namespace nfsp
