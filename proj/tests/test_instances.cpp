#include "test_instances.hpp"

namespace bidopt::testing {

Instance make_t1() {
  Instance inst;
  inst.impression_budget = 1000.0;
  inst.businesses.push_back(Business{"k1", 100.0, 2.0, {"c1"}});
  Campaign c{"c1", "k1", 0.4, {}};
  c.levels.push_back(BidLevel{0, 0.0, 0.0, 0.0, std::nullopt});
  c.levels.push_back(BidLevel{1, 50.0, 0.5, 100.0, 0.40});
  c.levels.push_back(BidLevel{2, 120.0, 0.8, 200.0, 0.70});
  inst.campaigns.push_back(std::move(c));
  return inst;
}

Instance make_gap_instance() {
  Instance inst;
  inst.impression_budget = 1000.0;
  inst.businesses.push_back(Business{"k1", 20.0, 100.0, {"g1"}});
  Campaign c{"g1", "k1", 0.5, {}};
  c.levels.push_back(BidLevel{0, 0.0, 0.0, 0.0, std::nullopt});
  c.levels.push_back(BidLevel{1, 11.0, 1.0, 10.0, 0.10});
  c.levels.push_back(BidLevel{2, 12.0, 1.25, 16.0, 0.20});
  c.levels.push_back(BidLevel{3, 30.0, 1.5, 20.0, 0.30});
  inst.campaigns.push_back(std::move(c));
  return inst;
}

Instance make_rollback_instance() {
  Instance inst;
  inst.impression_budget = 1000.0;
  inst.businesses.push_back(Business{"k1", 50.0 * (1.0 - 9e-7), 100.0, {"r1"}});
  Campaign c{"r1", "k1", 0.5, {}};
  c.levels.push_back(BidLevel{0, 0.0, 0.0, 0.0, std::nullopt});
  c.levels.push_back(BidLevel{1, 50.0, 0.5, 100.0, 0.55});
  inst.campaigns.push_back(std::move(c));
  return inst;
}

}  // namespace bidopt::testing
