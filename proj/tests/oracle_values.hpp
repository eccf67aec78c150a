// Generated by tests/oracle/derive.py. Do not edit by hand.
#pragma once

#include <cstddef>

namespace oracle {

inline constexpr double std_246 = 1.632993161855452;
inline constexpr double z_of_2 = -1.224744871391589;

inline constexpr double cm_accuracy = 0.75;
inline constexpr double cm_precision_macro = 0.7525252525252526;
inline constexpr double cm_recall_macro = 0.75;
inline constexpr double cm_f1_macro = 0.7493734335839599;
inline constexpr double log_loss_uniform_22 = 3.091042453358315;
inline constexpr double log_loss_clipped_zero = 34.538776394910684;
inline constexpr double mixed_posteriors[][3] = {
    {0.7, 0.2, 0.1},
    {0.1, 0.8, 0.1},
    {0.25, 0.25, 0.5},
    {0.6, 0.3, 0.1}};
inline constexpr std::size_t mixed_truth[] = {0, 1, 2, 1};
inline constexpr double mixed_log_loss = 0.6192346200347059;

inline constexpr double table_x[][3] = {
    {10.004, 5.597, -0.274},
    {7.328, 4.091, -0.992},
    {10.18, 7.68, -0.492},
    {8.139, 5.98, 0.357},
    {10.316, 3.139, -0.029},
    {12.086, 2.312, -0.458},
    {4.296, 2.421, -1.842},
    {9.295, 2.465, 0.271},
    {10.47, 4.626, -2.517},
    {8.384, 4.903, 0.113},
    {5.41, 4.044, -0.979},
    {7.573, 7.122, -0.808},
    {9.902, 6.769, -0.584},
    {9.665, 5.221, 0.064},
    {6.325, 5.152, 1.359},
    {5.359, 6.719, 0.119},
    {8.076, 9.001, 0.762},
    {6.402, 5.149, 0.577},
    {9.434, 6.366, -0.067},
    {12.002, 7.877, -0.676},
    {10.609, 4.073, 0.127},
    {6.438, 3.841, -0.196},
    {12.696, 7.29, -1.324},
    {7.616, 6.294, -1.992},
    {8.61, 4.805, 1.257},
    {12.068, 4.346, -0.369},
    {9.249, 8.047, -0.428},
    {9.089, 5.705, -0.121},
    {9.408, 2.772, -0.012},
    {8.669, 7.332, 0.653},
    {9.928, 6.337, -0.34},
    {13.156, 4.989, 0.583},
    {6.127, 5.693, -1.688},
    {3.894, 4.391, -0.9},
    {10.492, 9.49, -0.832},
    {8.128, 5.411, 0.493},
    {9.471, 4.588, 0.702},
    {11.56, 2.933, -0.079},
    {10.106, 2.891, 0.26},
    {7.426, 6.944, 0.193},
    {10.268, 3.818, -0.119},
    {4.007, 2.737, 0.363},
    {3.614, 6.693, -1.746},
    {12.27, 3.309, 0.779},
    {10.393, 1.926, 1.249}};
inline constexpr std::size_t table_y[] = {0, 0, 2, 1, 0, 2, 1, 1, 1, 0, 0, 0, 2, 0, 1, 0, 1, 1, 0, 2, 0, 0, 2, 1, 1, 2, 2, 0, 0, 1, 2, 2, 0, 0, 2, 1, 1, 2, 1, 0, 0, 1, 1, 2, 1};
inline constexpr double table_queries[][3] = {
    {7.075, 7.197, -0.543},
    {9.846, 3.413, -0.626},
    {6.167, 7.514, -0.154},
    {12.898, 5.027, -0.694},
    {9.02, 3.88, 0.008},
    {8.874, 4.4, -1.379}};
inline constexpr double tree_importances[] = {0.34442378978307114, 0.06255346449957229, 0.5930227457173566};
inline constexpr std::size_t tree_depth = 5;
inline constexpr std::size_t tree_leaves = 8;
inline constexpr double tree_proba[][3] = {
    {1.0, 0.0, 0.0},
    {0.0, 0.0, 1.0},
    {1.0, 0.0, 0.0},
    {0.0, 0.0, 1.0},
    {1.0, 0.0, 0.0},
    {1.0, 0.0, 0.0}};
inline constexpr double nb_proba[][3] = {
    {0.6441203299588335, 0.35116594733112616, 0.004713722710040394},
    {0.5263823655440103, 0.19499819146944444, 0.27861944298654506},
    {0.5488857395329194, 0.45065559457961135, 0.00045866588746891517},
    {0.15236840396561335, 0.04569149469398215, 0.8019401013404044},
    {0.6766048717506863, 0.24439926196101064, 0.07899586628830284},
    {0.4740607062551276, 0.47382036391138993, 0.05211892983348253}};
inline constexpr double knn_proba[][3] = {
    {0.6, 0.4, 0.0},
    {0.8, 0.2, 0.0},
    {0.8, 0.2, 0.0},
    {0.0, 0.0, 1.0},
    {0.6, 0.4, 0.0},
    {1.0, 0.0, 0.0}};

inline constexpr double line_slope = 2.0;
inline constexpr double line_at_plus6 = 69.99999999999999;

}  // namespace oracle
