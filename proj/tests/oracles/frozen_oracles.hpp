#pragma once
// generated by gen_oracles.py

namespace oracle {

inline constexpr double kIntervalTuples[] = {0.3, 0.4, 0.7, 0.2, 0.8, 1.1, 0.2, 0.1, 0.0, 1.0, 0.0, 1.0, 1.0, 0.0, 0.5};
inline constexpr double kIntervalLo[] = {1.21149789029535864978903, 1.561757453485765523425241, 1.2};
inline constexpr double kIntervalHi[] = {4.24812030075187969924812, 2.795362082994304312449146, 6.0};
inline constexpr double kGammaPCases[] = {0.0, 1.0, 1.0, 0.0, 3.0, 0.0, 0.3, 0.5, 0.1, 1.5, 0.2, 0.3, 0.4, 0.1, 2.5, 0.1, 0.7, 0.2, 0.3, 1.8};
inline constexpr double kGammaP[] = {0.4444444444444444444444444, 2.48447204968944099378882, 2.831858407079646017699115, 1.655322624557582357745712};
inline constexpr double kWeightedLenY[] = {0.5, 1.0, 1.5, 2.0};
inline constexpr double kWeightedLen[] = {0.5098846786683890345959133, 1.069770148728793201572428, 1.702496047249654800560876, 2.412231919426944956849123};
inline constexpr double kGaussL4Box4 = 0.9413962637767148126260396;
inline constexpr double kMoserL[] = {7.333333333333333333333333, 20.66666666666666666666667, 59.33333333333333333333333, 507.3333333333333333333333, 6.333333333333333333333333, 16.22222222222222222222222, 41.92592592592592592592593, 285.6954732510288065843621, 5.8, 14.1, 34.45, 208.1125};
inline constexpr double kMoserB[] = {9.163699348847012603505384, 12.78612997755627085938623, 19.03064219507655007998778, 49.17144042642217639124953, 44.37629052054003321059851, 69.59625126752172620973944, 116.7250429582405535538308, 392.4408337964139477111636, 304.7760249391072562207763, 538.3167221600762837088581, 1017.360681589223381944659, 4387.064941678410982617407};
inline constexpr double kSobolev34[] = {0.4272605428625266649876716, 0.3121892056977779516773161};

}  // namespace oracle
