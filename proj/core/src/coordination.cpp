#include "stripesim/coordination.hpp"

#include <stdexcept>

namespace stripesim {

namespace {

/// An AP agent owns only its local channel state. It consumes at most
/// one incoming side-info message and produces exactly one outgoing
/// message.
class ApAgent {
 public:
  ApAgent(int stripe, int position, StripeInput input)
      : stripe_(stripe), position_(position), input_(input) {}

  ApInpResult process(const std::optional<SideInfo>& incoming,
                      const CMat& Sigma_x, double C_F) const {
    try {
      return design_ap_inp(*input_.H_hat, *input_.Sigma_w, incoming, Sigma_x,
                           C_F);
    } catch (const std::exception& e) {
      throw NumericalError("run_protocol: stripe " +
                           std::to_string(stripe_ + 1) + ", AP " +
                           std::to_string(position_ + 1) + ": " + e.what());
    }
  }

  int position() const { return position_; }

 private:
  int stripe_;
  int position_;
  StripeInput input_;
};

}  // namespace

std::pair<std::pair<std::vector<ApInpResult>, SideInfo>, StripeTrace>
run_protocol(int stripe_index, const std::vector<StripeInput>& aps,
             const CMat& Sigma_x, double C_F) {
  if (aps.empty()) throw DomainError("run_protocol: empty stripe");

  std::vector<ApAgent> agents;
  agents.reserve(aps.size());
  for (std::size_t i = 0; i < aps.size(); ++i)
    agents.emplace_back(stripe_index, static_cast<int>(i), aps[i]);

  StripeTrace trace;
  trace.stripe = stripe_index;
  trace.hops = static_cast<int>(aps.size());

  std::vector<ApInpResult> results;
  results.reserve(aps.size());
  std::optional<SideInfo> in_flight;
  int clock = 0;
  for (const ApAgent& agent : agents) {
    ApInpResult res = agent.process(in_flight, Sigma_x, C_F);
    Message msg;
    msg.stripe = stripe_index;
    msg.from_ap = agent.position() + 1;
    msg.to_ap = agent.position() + 2;  // the last one addresses the CP
    msg.kind = PayloadKind::kSideInfo;
    msg.payload_reals = res.side_info_out.overhead_reals();
    msg.timestamp = ++clock;
    trace.overhead_reals_total += msg.payload_reals;
    trace.messages.push_back(msg);
    in_flight = res.side_info_out;
    results.push_back(std::move(res));
  }
  SideInfo final_si = *in_flight;
  return {{std::move(results), std::move(final_si)}, std::move(trace)};
}

std::vector<OverheadRow> overhead_report(int ues) {
  const long si = 2L * ues * ues;
  return {
      {"linear combining", "mrc", 0},
      {"linear combining", "mmse", si},
      {"fronthaul quantization", "naive", si},
      {"fronthaul quantization", "opt", si},
  };
}

long total_overhead_reals(const std::vector<StripeTrace>& traces) {
  long total = 0;
  for (const StripeTrace& t : traces) total += t.overhead_reals_total;
  return total;
}

}  // namespace stripesim
