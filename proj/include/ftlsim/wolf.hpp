#pragma once

#include "ftlsim/manager.hpp"

// Wolf: measured group statistics, closed-form OP allocation, dynamic group
// creation and merging, and aggressive movement of over-provisioned space.

namespace ftlsim {

class WolfManager final : public GroupedManager {
public:
    WolfManager(FlashDevice& dev, Lpa logical_pages, ManagerTunables tunables,
                const OracleClassifier* oracle = nullptr);

    const char* name() const override { return "wolf"; }

protected:
    int classify_target(Lpa lpa, int curr_id, WriteKind kind) override;
    void recompute_targets() override;
    void restructure() override;
    void consider_movement_operations() override;

private:
    void merge_or_create_groups();
    void create_group(int slot);
    void merge_groups(int keep_id, int absorb_id);

    // Consecutive intervals each adjacent SGV pair has kept its hit rates
    // within a factor of Q; keyed by (colder id, hotter id).
    std::map<std::pair<int, int>, int> convergence_;
    std::int64_t creation_ban_until_ = 0;
};

}  // namespace ftlsim
