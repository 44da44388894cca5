#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "axnn/matching.hpp"
#include "axnn/network.hpp"

namespace axnn {

void save_checkpoint(const QuantNetwork& net, const std::filesystem::path& path);

struct LoadedCheckpoint {
    QuantNetwork net;
    // multiplier names per layer; resolved against a library by the caller
    std::map<std::string, std::string> assignments;
};
LoadedCheckpoint load_checkpoint(const std::filesystem::path& path);

void save_assignment(const Assignment& a, const std::filesystem::path& path,
                     const std::string& library_source);
Assignment load_assignment(const std::filesystem::path& path);

}  // namespace axnn
