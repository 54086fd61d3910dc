#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "tomita/model.hpp"

namespace tomita {

/// JSON checkpoint: kind, hidden size, seed, initial state and every
/// parameter tensor with its name and shape. Doubles are written in
/// shortest round-trip form, so loading restores the model bit for bit.
std::string checkpoint_to_json(const RnnModel& model);
RnnModel checkpoint_from_json(std::string_view text);

void save_checkpoint(const RnnModel& model, const std::filesystem::path& path);
RnnModel load_checkpoint(const std::filesystem::path& path);

/// Reads a whole file; IoError when it cannot be opened.
std::string read_file(const std::filesystem::path& path);

/// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace tomita
