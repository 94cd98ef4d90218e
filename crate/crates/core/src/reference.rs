//! Published reference values for the bundled corpus, as printed.
//!
//! Percentages are stored as fractions. Monetary values are in millions of
//! USD unless a constant says otherwise.

/// Column order used by the multiples tables.
pub const MULTIPLES_COMPANIES: [&str; 6] = [
    "Facebook",
    "Twitter",
    "Pinterest",
    "Snapchat",
    "Sina Weibo",
    "VKontakte",
];

/// Column order used by the discounted cash flow tables.
pub const DCF_COMPANIES: [&str; 4] = ["Facebook", "Twitter", "Sina Weibo", "VKontakte"];

/// Cost of equity per [`DCF_COMPANIES`] entry.
pub const COST_OF_EQUITY: [f64; 4] = [0.0795, 0.0598, 0.0960, 0.1770];
pub const WACC: [f64; 4] = [0.072, 0.052, 0.075, 0.151];

/// Enterprise value, millions of USD.
pub const DCF_VALUE: [f64; 4] = [585_618.0, 27_293.0, 2_501.0, 5_270.0];
pub const DCF_ACTUAL: [f64; 4] = [584_350.0, 22_072.0, 2_171.0, 6_852.0];
pub const DCF_DEVIATION: [f64; 4] = [0.0022, 0.2365, 0.1521, -0.2309];

/// FCFF per forecast year 2020-2024 plus the post-forecast period, in each
/// company file's unit (millions for Facebook, thousands otherwise).
pub const PRINTED_FCFF: [(&str, [f64; 6]); 4] = [
    ("Facebook", [8_687.0, 16_710.0, 21_108.0, 25_417.0, 29_690.0, 36_955.0]),
    (
        "Twitter",
        [373_250.0, 232_187.0, 457_590.0, 721_815.0, 1_005_300.0, 993_351.0],
    ),
    (
        "Sina Weibo",
        [-1_700_055.0, -4_628.0, 14_576.0, 35_107.0, 57_132.0, 80_829.0],
    ),
    (
        "VKontakte",
        [
            8_997_402.0,
            14_912_537.0,
            20_515_335.0,
            27_253_753.0,
            33_541_718.0,
            40_863_512.0,
        ],
    ),
];

/// Rows: EV/EBIT, EV/EBITDA, EV/R, EV/DAU, EV/MAU. Columns:
/// [`MULTIPLES_COMPANIES`].
pub const OWN_MULTIPLES: [[f64; 6]; 5] = [
    [23.55, 56.57, -7.16, -23.46, 8.51, 52.06],
    [19.13, 25.79, -7.31, -25.62, 6.88, 52.06],
    [8.27, 6.38, 8.52, 14.13, 1.00, 22.93],
    [352.66, 145.21, 38.96, 111.19, 9.78, 297.91],
    [233.93, 66.88, 29.08, 82.73, 4.21, 95.70],
];

/// Peer-average multiples with the column company left out.
pub const PEER_AVERAGES: [[f64; 6]; 5] = [
    [17.31, 10.70, 23.45, 26.71, 20.31, 11.60],
    [10.36, 9.03, 15.65, 19.31, 12.81, 3.77],
    [10.59, 10.97, 10.54, 9.42, 12.05, 7.66],
    [120.61, 162.10, 183.35, 168.90, 189.19, 131.56],
    [55.72, 89.13, 96.69, 85.96, 101.66, 83.37],
];

/// Implied values per multiple, then the average row. Millions of USD.
pub const IMPLIED_VALUES: [[f64; 6]; 6] = [
    [429_372.0, 4_175.0, 31_907.0, 27_596.0, 5_184.0, 1_527.0],
    [316_530.0, 7_724.0, 20_858.0, 18_268.0, 4_045.0, 497.0],
    [748_940.0, 37_951.0, 12_047.0, 16_162.0, 26_055.0, 2_289.0],
    [199_854.0, 24_639.0, 45_838.0, 36_821.0, 42_000.0, 3_026.0],
    [139_188.0, 29_412.0, 32_391.0, 25_186.0, 52_458.0, 5_969.0],
    [366_777.0, 20_780.0, 28_608.0, 24_806.0, 25_948.0, 2_662.0],
];

/// Deviations of [`IMPLIED_VALUES`] from the actual values, rounded to
/// whole percent.
pub const MULTIPLE_DEVIATIONS: [[f64; 6]; 6] = [
    [-0.27, -0.81, 2.28, 0.14, 1.39, -0.78],
    [-0.46, -0.65, 1.14, -0.25, 0.86, -0.93],
    [0.28, 0.72, 0.24, -0.33, 11.00, -0.67],
    [-0.66, 0.12, 3.71, 0.52, 18.35, -0.56],
    [-0.76, 0.33, 2.33, 0.04, 23.16, -0.13],
    [-0.37, -0.06, 1.94, 0.02, 10.95, -0.61],
];

pub const MULTIPLE_ROW_LABELS: [&str; 6] =
    ["EV/EBIT", "EV/EBITDA", "EV/R", "EV/DAU", "EV/MAU", "Average"];
