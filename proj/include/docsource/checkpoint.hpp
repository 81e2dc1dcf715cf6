#pragma once

#include <string>

#include "docsource/network.hpp"

namespace docsource {

// Trained model snapshot. save/load round-trips are byte exact.
//
// File layout (all integers/floats little-endian):
//   magic "DSCNN" (5 bytes), version byte (currently 1)
//   config: p, S, conv_filters, kernel, dense_units, epochs, batch_size (u32 each),
//           lr0, decay (f64), seed (u64), val_fraction (f64)
//   u32 parameter-block count; per block: u16 name length + name bytes,
//           u32 rank, u32 dims..., then f64 values
//   3 batchnorm running-stat pairs (mean then var, f64 x conv_filters each)
//   u32 epoch index (1-based), f64 validation loss
struct Checkpoint {
    NetworkConfig config;
    std::vector<std::pair<std::string, Eigen::ArrayXd>> param_blocks; // layer order
    std::vector<Eigen::ArrayXd> bn_running; // mean1, var1, mean2, var2, mean3, var3
    int epoch = 0;
    double val_loss = 0.0;

    static Checkpoint from_network(const Network& net, int epoch, double val_loss);
    Network to_network() const; // throws BadFormat on inconsistent shapes
};

void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

} // namespace docsource
