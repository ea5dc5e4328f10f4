/// (sample_a, sample_b, t, p) with t and p from scipy.stats.ttest_ind(a, b, equal_var=False).
pub const WELCH_CASES: [(&[f64], &[f64], f64, f64); 20] = [
    (
        &[37.731, 53.529, 7.615, 56.721, 42.372, 32.799, 52.32, 3.79, 46.237, 32.675, 59.686, 60.461, 28.022],
        &[-34.602, 2.99, 21.254, -0.086, -6.674, -37.311, -1.208],
        5.0242486485175375,
        0.0003827191263170655,
    ),
    (
        &[48.39, 40.876, 54.285, 33.855, 47.239, 41.137, 58.053, 15.991],
        &[29.883, 48.658, 15.709, 22.686, 37.901, 41.943, 7.029, 29.773, 45.842, 46.151],
        1.5378206328134083,
        0.14421081377008624,
    ),
    (
        &[69.404, 15.642, 39.186, 24.307, 60.756, 11.238, 61.353, 5.17, 0.514, 22.71, 40.081, -3.662, 23.911],
        &[13.725, 12.307, 5.293, 14.313, 14.722, -17.111, 34.074, -0.639, -9.293, 9.446, -7.469, 9.866, -18.544, 11.391, -19.515, 5.959, -3.191, -7.67],
        3.4679672252998324,
        0.002752039931586419,
    ),
    (
        &[-1.176, 17.693, -18.282, 8.162, 7.257, -19.784, -3.69, 0.41, -17.214, 7.229, 4.756, 14.834, -1.239, 5.593, 16.231, -3.534, -12.171, -23.848, -2.508],
        &[14.375, 32.475, 14.799, 44.124, -2.079, 11.728, 48.535, -23.943, 15.612, 36.952, -18.633, -8.714, -23.714, 42.554],
        -1.9288400700350505,
        0.07010148594983398,
    ),
    (
        &[-16.344, 23.174, 1.016],
        &[-25.104, -17.103, -23.396, -23.856, -23.069, -22.108, -20.0, -24.446],
        2.178886490409185,
        0.15951045474547135,
    ),
    (
        &[11.366, -3.984, 12.384, -10.142, 17.132, -10.96, 0.443, 3.635, 12.907, 17.975, 1.979, 22.912, -7.871, 5.129, -1.265, 7.91, -9.371, -11.026],
        &[36.511, 0.443, 37.394, 33.257],
        -2.5590559587690658,
        0.07107234749535925,
    ),
    (
        &[-36.518, -35.612, -31.677, -36.669, -40.559, -29.958, -33.629, -40.747, -38.666],
        &[-8.25, -17.167, -18.819, -9.211, -21.384, -16.856, -1.957],
        -7.732075793318481,
        3.64291592597283e-05,
    ),
    (
        &[2.995, 73.133, 10.722],
        &[66.296, 51.309, 18.263, 55.738],
        -0.773372845620687,
        0.4978622885593787,
    ),
    (
        &[-5.888, -1.264, -11.103, 3.939, 2.683, -0.27],
        &[17.372, 6.339, 10.215, 23.267, 16.752, -11.672, 13.354, -3.231, -19.645, 23.456, -10.231],
        -1.5762998597599414,
        0.13730207146849063,
    ),
    (
        &[18.06, -9.566, 30.042, 17.852, 47.615, 33.124, 44.528, -30.165, -8.603, 25.479, 32.476, -0.748, -3.342, 19.23, 24.315, 85.839, 7.292, 38.116, -37.164, 16.777, 9.389, -22.967, -12.334],
        &[-105.989, -44.785, -36.045, -44.102, -0.537, -38.849, -28.339, -33.595, -27.655, -73.401, -43.359, 37.477, -19.51, -38.571, -49.698],
        5.0656422732895825,
        2.3917598848167294e-05,
    ),
    (
        &[-2.089, -21.14, -27.253, -40.904, -59.468, -13.779, -15.568, -42.106, -39.467, -53.408, -50.697, -33.975, -26.471, -2.14, -10.27, -39.132],
        &[33.357, 36.527, 40.116],
        -13.619088741979397,
        1.7873565234457937e-10,
    ),
    (
        &[-51.709, -31.343, -27.24, -34.305, -42.52],
        &[13.385, 30.482, -2.769, -10.67, 12.619, 35.438, 5.541, 19.997, 27.426, 9.556, 21.278, -0.822, 27.886, 15.099, 9.895, -0.365, -33.119, 13.594],
        -8.24146197775375,
        4.210570872038332e-06,
    ),
    (
        &[39.797, -22.675, -22.514, -20.035, -53.902, -36.926, -30.836, -9.888, -0.966, -43.863, 13.565, -95.67, 28.051, 0.935, 6.259, -15.513],
        &[23.442, 17.104, 32.088, 30.405, 19.77, 28.024, 19.16, 54.393],
        -4.810131016119948,
        9.564001302113495e-05,
    ),
    (
        &[-40.354, 47.002, 73.87, 18.827, 55.186, 61.099, 15.674, 123.065, 48.889, 45.41, 47.995, 78.608, 111.121, 36.057, 2.739],
        &[40.104, -31.222, -3.024, 5.398, -0.462, -4.714, -7.677, 48.653, -4.219, 35.163, 1.817, 21.556, 35.649, 18.844, -51.579, -25.224, -12.716, 20.862, -16.99, -20.497],
        3.80682907563416,
        0.0009459140463576834,
    ),
    (
        &[9.635, 12.277, 3.12, 7.827, -0.93, 14.568],
        &[-30.082, 39.045, 14.563, -31.234, 15.859],
        0.4345042135981186,
        0.6851659205208367,
    ),
    (
        &[-93.376, 6.685, -92.776, -13.677, -52.409, -25.08, -8.43, -69.191, -91.086, 32.669],
        &[34.509, 108.238, 60.986, -36.222],
        -2.469707750060169,
        0.06275174722248199,
    ),
    (
        &[4.766, 38.261, 19.152, 42.618, 17.219, 4.915, 63.919, 34.947, 21.159, 41.694, 24.089, 13.25, 35.404, 29.216, 14.992, 27.262],
        &[7.049, -3.736, -12.827, -15.703, 19.642, -4.056, 12.32, 10.041],
        4.31477648205571,
        0.0004663950173590455,
    ),
    (
        &[-50.91, -54.605, -41.284, -39.738, -37.469, -89.474, -57.596, -55.852, -58.539, -34.991, -55.277, -59.211, -45.286, -54.767, -48.943, -57.575, -59.348, -41.217, -49.281, -56.788, -50.634],
        &[28.275, 29.183, 25.574, 28.212, 21.392, 25.804, 29.41, 26.417, 30.595, 27.821, 27.968, 21.391, 22.914, 26.438, 27.121, 30.643, 27.408, 30.71, 23.681, 33.47, 25.744],
        -30.692029602117582,
        4.00029112284205e-20,
    ),
    (
        &[20.878, -6.642, -20.457, -0.623, -8.596, 50.548, 0.314, 16.986, -1.016, 52.188, -3.694, 0.596, -24.809, 19.378, 16.323, 50.821, 50.287],
        &[69.651, 39.337, 61.892, 19.443, 41.646, 48.789, 75.615, 85.027, 5.733, 13.987, 38.129, 33.505, 33.786, -8.77, 46.519, 28.446, 57.121, 54.917, 12.1, 64.853],
        -3.4640094229888247,
        0.0014682180679966687,
    ),
    (
        &[-56.567, -37.848, -41.963, -58.91, -101.762, -41.627, -61.949, -52.06, 3.98, -90.796, -62.08, -19.663, -66.703, 13.025, 7.349, -100.067, 19.662, -57.893],
        &[37.721, 26.007, 22.677, 27.201, 31.423, 23.707, 29.342, 27.368, 26.76, 31.637, 19.946, 20.541, 23.566, 30.842, 30.03, 26.077, 29.762, 20.866, 24.134, 30.06, 33.996],
        -8.198411790102636,
        2.1558176069191875e-07,
    ),
];
