// metrics.cpp

#include "ndf/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace ndf {

PowerRatios power_ratios(const Mask& mask, const Spectrogram& direct_stem) {
  if (mask.num_bins != direct_stem.num_bins || mask.num_frames != direct_stem.num_frames)
    throw InvalidArgument("power_ratios: shape mismatch");
  const std::size_t F = mask.num_bins;
  const std::size_t T = mask.num_frames;

  PowerRatios out;
  out.narrowband.assign(F, kUndefinedDb);
  out.defined.assign(F, false);
  double num_total = 0.0;
  double den_total = 0.0;
  for (std::size_t f = 0; f < F; ++f) {
    double num = 0.0;
    double den = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
      const auto x = direct_stem.at(f, t);
      num += std::norm(mask.at(f, t) * x);
      den += std::norm(x);
    }
    num_total += num;
    den_total += den;
    if (den > 0.0) {
      out.narrowband[f] = num / den;
      out.defined[f] = true;
    }
  }
  if (den_total <= 0.0)
    throw DegenerateSignalError("power_ratios: direct stem carries no energy");
  out.wideband = num_total / den_total;
  return out;
}

PatternEstimate estimate_power_pattern(std::span<const PatternSample> samples,
                                       std::span<const double> grid_deg,
                                       double bin_half_width_deg) {
  if (grid_deg.empty()) throw InvalidArgument("estimate_power_pattern: empty grid");
  const std::size_t P = grid_deg.size();

  PatternEstimate est;
  est.grid_deg.assign(grid_deg.begin(), grid_deg.end());
  est.counts.assign(P, 0);
  est.wideband_db.assign(P, kUndefinedDb);
  est.wideband_std.assign(P, 0.0);

  std::size_t F = 0;
  std::vector<std::vector<double>> wb(P);          // per-direction wideband ratios
  std::vector<std::vector<double>> nb_sum;         // [p][f] linear sums
  std::vector<std::vector<std::size_t>> nb_count;  // [p][f]

  for (const PatternSample& s : samples) {
    if (!s.mask || !s.direct_stem)
      throw InvalidArgument("estimate_power_pattern: null sample entry");
    if (F == 0) {
      F = s.direct_stem->num_bins;
      nb_sum.assign(P, std::vector<double>(F, 0.0));
      nb_count.assign(P, std::vector<std::size_t>(F, 0));
    }

    // Exact grid membership with a nearest-bin fallback.
    std::size_t p = P;
    double best = bin_half_width_deg + 1.0;
    for (std::size_t i = 0; i < P; ++i) {
      const double d = angular_distance_deg(s.doa_deg, grid_deg[i]);
      if (d < best) {
        best = d;
        p = i;
      }
    }
    if (p == P || best > bin_half_width_deg)
      throw InvalidArgument("estimate_power_pattern: DOA " + std::to_string(s.doa_deg) +
                            " deg is not on the candidate grid");

    const PowerRatios r = power_ratios(*s.mask, *s.direct_stem);
    wb[p].push_back(r.wideband);
    for (std::size_t f = 0; f < F; ++f) {
      if (!r.defined[f]) continue;
      nb_sum[p][f] += r.narrowband[f];
      ++nb_count[p][f];
    }
  }

  est.narrowband_db.assign(P, std::vector<double>(F, kUndefinedDb));
  for (std::size_t p = 0; p < P; ++p) {
    est.counts[p] = wb[p].size();
    if (wb[p].empty()) continue;  // direction flagged missing
    double mean = 0.0;
    for (double v : wb[p]) mean += v;
    mean /= static_cast<double>(wb[p].size());
    double var = 0.0;
    for (double v : wb[p]) var += (v - mean) * (v - mean);
    var /= static_cast<double>(wb[p].size());
    est.wideband_db[p] = db_from_power(mean);
    est.wideband_std[p] = std::sqrt(var);
    for (std::size_t f = 0; f < F; ++f)
      if (nb_count[p][f] > 0)
        est.narrowband_db[p][f] =
            db_from_power(nb_sum[p][f] / static_cast<double>(nb_count[p][f]));
  }
  return est;
}

namespace {

std::vector<double> df_ratio_db(std::span<const Spectrogram> numerators,
                                std::span<const Mask> masks,
                                std::span<const Spectrogram> denominators) {
  const std::size_t F = numerators[0].num_bins;
  std::vector<double> num(F, 0.0);
  std::vector<double> den(F, 0.0);
  double num_total = 0.0;
  for (std::size_t k = 0; k < numerators.size(); ++k) {
    const Spectrogram& y = numerators[k];
    for (std::size_t f = 0; f < F; ++f) {
      for (std::size_t t = 0; t < y.num_frames; ++t) {
        const double p = std::norm(y.at(f, t));
        num[f] += p;
        num_total += p;
        if (!masks.empty())
          den[f] += std::norm(masks[k].at(f, t) * y.at(f, t));
      }
      if (masks.empty()) {
        const Spectrogram& z = denominators[k];
        for (std::size_t t = 0; t < z.num_frames; ++t) den[f] += std::norm(z.at(f, t));
      }
    }
  }
  if (num_total <= 0.0)
    throw DegenerateSignalError("DF estimate: reverberant stems carry no energy");
  std::vector<double> df(F);
  for (std::size_t f = 0; f < F; ++f) {
    if (den[f] <= 0.0)
      df[f] = std::numeric_limits<double>::infinity();  // flagged, not a crash
    else
      df[f] = db_from_power(num[f] / den[f]);
  }
  return df;
}

}  // namespace

std::vector<double> estimate_df_db(std::span<const Mask> masks,
                                   std::span<const Spectrogram> reverb_stems) {
  if (reverb_stems.empty() || masks.size() != reverb_stems.size())
    throw InvalidArgument("estimate_df: need one mask per reverberant stem");
  for (std::size_t k = 0; k < masks.size(); ++k)
    if (masks[k].num_bins != reverb_stems[k].num_bins ||
        masks[k].num_frames != reverb_stems[k].num_frames)
      throw InvalidArgument("estimate_df: shape mismatch");
  return df_ratio_db(reverb_stems, masks, {});
}

std::vector<double> estimate_df_target_db(std::span<const Spectrogram> vdm_targets,
                                          std::span<const Spectrogram> reverb_stems) {
  if (reverb_stems.empty() || vdm_targets.size() != reverb_stems.size())
    throw InvalidArgument("estimate_df_target: need one target per stem");
  return df_ratio_db(reverb_stems, {}, vdm_targets);
}

double sdr_db(std::span<const double> target, std::span<const double> estimate,
              double eps) {
  if (target.empty() || target.size() != estimate.size())
    throw InvalidArgument("sdr: signals must be non-empty and equal length");
  double sig = 0.0;
  double err = 0.0;
  for (std::size_t i = 0; i < target.size(); ++i) {
    sig += target[i] * target[i];
    const double d = target[i] - estimate[i];
    err += d * d;
  }
  return db_from_power(sig / (err + eps));
}

double aggregate_sdr_db(std::span<const double> per_sample_sdr_db) {
  if (per_sample_sdr_db.empty()) throw InvalidArgument("aggregate_sdr: empty input");
  double acc = 0.0;
  for (double v : per_sample_sdr_db) acc += v;
  return acc / static_cast<double>(per_sample_sdr_db.size());
}

double loss_tsdr(SignalBatch target, SignalBatch estimate, double eps) {
  if (target.empty() || target.size() != estimate.size())
    throw InvalidArgument("loss_tsdr: batch size mismatch");
  constexpr double kTau = 1e-4;  // 10^(-40/10)
  double err = 0.0;
  double sig = 0.0;
  for (std::size_t b = 0; b < target.size(); ++b) {
    if (target[b].size() != estimate[b].size())
      throw InvalidArgument("loss_tsdr: length mismatch in batch");
    for (std::size_t i = 0; i < target[b].size(); ++i) {
      const double d = target[b][i] - estimate[b][i];
      err += d * d;
      sig += target[b][i] * target[b][i];
    }
  }
  return 10.0 * std::log10(err / (sig + eps) + kTau);
}

double loss_l1(SignalBatch target, SignalBatch estimate, double eps) {
  if (target.empty() || target.size() != estimate.size())
    throw InvalidArgument("loss_l1: batch size mismatch");
  double err = 0.0;
  double sig = 0.0;
  for (std::size_t b = 0; b < target.size(); ++b) {
    if (target[b].size() != estimate[b].size())
      throw InvalidArgument("loss_l1: length mismatch in batch");
    for (std::size_t i = 0; i < target[b].size(); ++i) {
      err += std::fabs(target[b][i] - estimate[b][i]);
      sig += std::fabs(target[b][i]);
    }
  }
  return err / (sig + eps);
}

std::vector<SegmentLevelDiff> stereo_level_difference(std::span<const double> left,
                                                      std::span<const double> right,
                                                      double segment_s, double overlap,
                                                      double sample_rate) {
  if (left.size() != right.size() || left.empty())
    throw InvalidArgument("stereo_level_difference: equal-length inputs required");
  if (!(overlap >= 0.0 && overlap < 1.0))
    throw InvalidArgument("stereo_level_difference: overlap must lie in [0, 1)");
  const std::size_t seg = static_cast<std::size_t>(std::lround(segment_s * sample_rate));
  const std::size_t hop =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(seg * (1.0 - overlap))));
  if (seg == 0 || seg > left.size())
    throw InvalidArgument("stereo_level_difference: segment longer than the signal");

  std::vector<SegmentLevelDiff> out;
  for (std::size_t start = 0; start + seg <= left.size(); start += hop) {
    double el = 0.0;
    double er = 0.0;
    for (std::size_t i = start; i < start + seg; ++i) {
      el += left[i] * left[i];
      er += right[i] * right[i];
    }
    SegmentLevelDiff d;
    d.time_s = static_cast<double>(start) / sample_rate;
    if (el <= 0.0 || er <= 0.0) {
      d.defined = false;
      d.diff_db = kUndefinedDb;
    } else {
      d.diff_db = 10.0 * std::log10(el / er);
    }
    out.push_back(d);
  }
  return out;
}

}  // namespace ndf
