#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "stunmix/data_model.hpp"

namespace stunmix {

// One row per pixel:
//   pixel_id,grid_x,grid_y,lon,lat,altitude,slope,precip,pet,tmean,tmax,tmin,
//   b1_m1..b1_mT,b2_m1..,bB_mT,abund_1..abund_K
// Empty band cells are missing observations. Month m is stored at timestamp m-1.

std::string dataset_csv_header(int bands, int steps, int classes);
std::string format_dataset_csv(const Dataset& dataset);
Dataset parse_dataset_csv(std::string_view text);

void save_dataset_csv(const std::filesystem::path& path, const Dataset& dataset);
Dataset load_dataset_csv(const std::filesystem::path& path);

}  // namespace stunmix
