#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace debut::testing {

// Reference chains with their layer compression in percent (2 decimals) and,
// where stated, total nonzeros.
struct NamedChain {
  std::string_view name;
  std::string_view text;
  double lc_percent;
  std::optional<std::size_t> nonzeros = std::nullopt;
};

inline const std::vector<NamedChain>& fixture_chains() {
  static const std::vector<NamedChain> chains = {
      {"butterfly16", "16 <-(2,2,8)- 16 <-(2,2,4)- 16 <-(2,2,2)- 16 <-(2,2,1)- 16", 50.00, 128},
      // LeNet FC1 [128, 400]
      {"lenet_fc1_mono_a", "128 <-(2,2,64)- 128 <-(2,2,32)- 128 <-(2,2,16)- 128 <-(2,2,8)- 128 <-(8,25,1)- 400", 91.75},
      {"lenet_fc1_mono_b", "128 <-(2,2,64)- 128 <-(2,2,32)- 128 <-(1,2,32)- 256 <-(2,2,16)- 256 <-(16,25,1)- 400", 85.00,
       7680},
      {"lenet_fc1_bulge_a", "128 <-(2,4,64)- 256 <-(2,4,32)- 512 <-(4,5,8)- 640 <-(8,5,1)- 400", 85.75},
      {"lenet_fc1_bulge_b", "128 <-(2,4,64)- 256 <-(2,4,32)- 512 <-(2,1,16)- 256 <-(16,25,1)- 400", 83.50},
      {"lenet_fc1_bulge_c", "128 <-(2,4,64)- 256 <-(1,2,64)- 512 <-(2,2,32)- 512 <-(2,1,16)- 256 <-(16,25,1)- 400",
       82.50},
      // LeNet FC2 [64, 128]
      {"lenet_fc2", "64 <-(2,2,32)- 64 <-(2,2,16)- 64 <-(2,2,8)- 64 <-(2,2,4)- 64 <-(2,2,2)- 64 <-(2,4,1)- 128", 89.06,
       896},
      // LeNet CONV2 [16, 72]
      {"lenet_conv2_mono_a", "16 <-(4,4,4)- 16 <-(2,2,2)- 16 <-(1,3,2)- 48 <-(2,3,1)- 72", 75.00},
      {"lenet_conv2_mono_b", "16 <-(8,8,2)- 16 <-(1,3,2)- 48 <-(2,3,1)- 72", 72.22},
      {"lenet_conv2_mono_c", "16 <-(2,3,8)- 24 <-(1,2,8)- 48 <-(2,2,4)- 48 <-(4,6,1)- 72", 58.33},
      {"lenet_conv2_bulge_a", "16 <-(2,2,8)- 16 <-(2,6,4)- 48 <-(1,2,4)- 96 <-(4,3,1)- 72", 55.56, 512},
      {"lenet_conv2_bulge_b", "16 <-(2,3,8)- 24 <-(1,2,8)- 48 <-(2,4,4)- 96 <-(4,3,1)- 72", 50.00},
      {"lenet_conv2_bulge_c", "16 <-(2,6,8)- 48 <-(1,2,8)- 96 <-(2,2,4)- 96 <-(4,3,1)- 72", 41.67, 672},
      // VGG-16-BN [512, 4608] and [512, 2304]
      {"vgg_conv13_mono_a",
       "512 <-(2,4,256)- 1024 <-(2,4,128)- 2048 <-(2,2,64)- 2048 <-(2,2,32)- 2048 <-(2,2,16)- 2048 <-(2,4,8)- 4096 "
       "<-(8,9,1)- 4608",
       97.31},
      {"vgg_conv13_mono_b",
       "512 <-(2,4,256)- 1024 <-(2,2,128)- 1024 <-(2,4,64)- 2048 <-(2,4,32)- 4096 <-(2,2,16)- 4096 <-(2,2,8)- 4096 "
       "<-(8,9,1)- 4608",
       97.05},
      {"vgg_conv13_mono_c",
       "512 <-(2,4,256)- 1024 <-(2,4,128)- 2048 <-(2,4,64)- 4096 <-(2,2,32)- 4096 <-(2,2,16)- 4096 <-(2,2,8)- 4096 "
       "<-(8,9,1)- 4608",
       96.79, 75776},
      {"vgg_conv8_mono",
       "512 <-(2,2,256)- 512 <-(2,4,128)- 1024 <-(2,4,64)- 2048 <-(2,2,32)- 2048 <-(2,2,16)- 2048 <-(2,2,8)- 2048 "
       "<-(8,9,1)- 2304",
       96.79, 37888},
      {"vgg_conv13_bulge_a",
       "512 <-(2,4,256)- 1024 <-(2,4,128)- 2048 <-(2,4,64)- 4096 <-(2,2,32)- 4096 <-(2,4,16)- 8192 <-(4,3,4)- 6144 "
       "<-(4,3,1)- 4608",
       96.53},
      {"vgg_conv13_bulge_b",
       "512 <-(2,4,256)- 1024 <-(2,4,128)- 2048 <-(2,4,64)- 4096 <-(2,4,32)- 8192 <-(2,2,16)- 8192 <-(4,3,4)- 6144 "
       "<-(4,3,1)- 4608",
       96.18},
      {"vgg_conv13_bulge_c",
       "512 <-(2,4,256)- 1024 <-(2,4,128)- 2048 <-(2,4,64)- 4096 <-(2,4,32)- 8192 <-(2,2,16)- 8192 <-(16,9,1)- 4608",
       94.88},
      // ResNet-50 last bottleneck blocks
      {"resnet_reduce_bulge",
       "512 <-(2,2,256)- 512 <-(2,4,128)- 1024 <-(2,2,64)- 1024 <-(2,2,32)- 1024 <-(2,4,16)- 2048 <-(2,2,8)- 2048 "
       "<-(2,2,4)- 2048 <-(4,2,1)- 1024",
       95.51},
      {"resnet_expand",
       "2048 <-(2,2,1024)- 2048 <-(2,2,512)- 2048 <-(4,2,128)- 1024 <-(2,2,64)- 1024 <-(2,2,32)- 1024 <-(2,2,16)- 1024 "
       "<-(2,2,8)- 1024 <-(2,2,4)- 1024 <-(4,2,1)- 512",
       97.66},
      {"resnet_reduce_wide_bulge",
       "512 <-(2,8,256)- 2048 <-(4,16,64)- 8192 <-(4,4,16)- 8192 <-(4,4,4)- 8192 <-(4,1,1)- 2048", 89.45},
      {"resnet_square_mono", "512 <-(2,4,256)- 1024 <-(4,4,64)- 1024 <-(4,4,16)- 1024 <-(4,4,4)- 1024 <-(4,4,1)- 1024",
       96.48},
      {"resnet_reduce_mono",
       "512 <-(2,2,256)- 512 <-(2,4,128)- 1024 <-(4,4,32)- 1024 <-(2,4,16)- 2048 <-(4,4,4)- 2048 <-(4,4,1)- 2048",
       97.36},
  };
  return chains;
}

inline const NamedChain& fixture(std::string_view name) {
  for (const auto& c : fixture_chains())
    if (c.name == name) return c;
  throw std::out_of_range(std::string(name));
}

}  // namespace debut::testing
