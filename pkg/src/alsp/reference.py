"""Published reference measurements for the two supported model families.

These numbers come from large-scale GPU evaluations (real decoding over
full ASR corpora) and are NOT reproducible inside this repository, which
deliberately contains no model inference.  They are shipped as
documentation fixtures: ratio accounting is tested against them, trend
tests cite them, and the CLI can print them next to desk-scale results.

Conventions: WER/cWER in percent; token retention ratios in percent;
GFLOPs are prompt-processing totals as reported by the original harness
(absolute values depend on its counting convention and are not a target
for our analytic model; ratios are).
"""

# corpus-level baseline WER (%) with no compression, Librispeech test-clean
BASELINE_WER = {"qwen2_audio": 1.65, "kimi_audio": 1.34}

# per-model retention budgets R used by the word-aligned interventions
INTERVENTION_BUDGETS = {"qwen2_audio": (2, 4, 8, 16), "kimi_audio": (1, 2, 4, 8)}

# dataset-level audio token retention (%) produced by those budgets
INTERVENTION_TOKEN_RATIOS = (25.67, 47.57, 76.08, 97.73)

# efficiency block: method -> (FRR %, prefill GFLOPs, FLOPs ratio %)
EFFICIENCY = {
    "qwen2_audio": {
        "vanilla": (100.0, 780.94, 100.0),
        "aggressive": {
            "ap_in": (78.64, 612.93, 78.49),
            "ap_deep": (14.30, 718.12, 91.96),
            "dap": (14.91, 566.30, 72.52),
        },
        "conservative": {
            "ap_in": (93.56, 730.28, 93.51),
            "ap_deep": (33.29, 731.96, 93.73),
            "dap": (33.76, 686.39, 87.89),
        },
    },
    "kimi_audio": {
        "vanilla": (100.0, 407.22, 100.0),
        "aggressive": {
            "ap_in": (86.28, 351.18, 86.24),
            "ap_deep": (48.81, 377.39, 92.68),
            "dap": (40.71, 324.64, 79.72),
        },
        "conservative": {
            "ap_in": (96.44, 392.69, 96.43),
            "ap_deep": (71.18, 390.42, 95.87),
            "dap": (68.19, 376.14, 92.36),
        },
    },
}

# word-aligned oracle interventions, single layer at a time:
# operator -> token ratio % -> layer -> (WER %, cWER %)
ORACLE_WER = {
    "qwen2_audio": {
        "random_drop": {
            25.67: {0: (177.15, 65.89), 5: (421.39, 76.41), 10: (382.52, 70.54),
                    15: (454.25, 67.11), 20: (154.46, 26.69), 25: (2.20, 1.98),
                    30: (1.63, 1.63)},
            47.57: {0: (37.54, 24.30), 5: (79.14, 25.28), 10: (73.42, 20.28),
                    15: (91.95, 18.77), 20: (32.87, 7.74), 25: (1.80, 1.80),
                    30: (1.64, 1.64)},
            76.08: {0: (6.33, 4.88), 5: (9.41, 4.84), 10: (6.87, 3.71),
                    15: (6.92, 3.26), 20: (4.97, 2.55), 25: (1.69, 1.69),
                    30: (1.65, 1.65)},
            97.73: {0: (1.70, 1.70), 5: (1.72, 1.72), 10: (2.05, 1.70),
                    15: (1.69, 1.69), 20: (1.67, 1.67), 25: (1.66, 1.66),
                    30: (1.65, 1.65)},
        },
        "uniform_drop": {
            25.67: {0: (141.13, 58.21), 5: (274.25, 61.83), 10: (244.44, 53.83),
                    15: (300.56, 49.31), 20: (102.06, 18.25), 25: (2.38, 1.91),
                    30: (1.63, 1.63)},
            47.57: {0: (23.78, 17.29), 5: (42.49, 16.98), 10: (38.46, 13.39),
                    15: (46.25, 12.23), 20: (20.78, 5.54), 25: (1.79, 1.79),
                    30: (1.64, 1.64)},
            76.08: {0: (3.23, 3.23), 5: (3.41, 2.84), 10: (4.00, 2.56),
                    15: (4.28, 2.30), 20: (2.43, 1.97), 25: (1.70, 1.70),
                    30: (1.65, 1.65)},
            97.73: {0: (1.73, 1.73), 5: (1.71, 1.71), 10: (1.69, 1.69),
                    15: (1.68, 1.68), 20: (1.66, 1.66), 25: (1.66, 1.66),
                    30: (1.65, 1.65)},
        },
        "uniform_merge": {
            25.67: {0: (183.57, 58.21), 5: (169.63, 56.23), 10: (72.25, 33.45),
                    15: (90.65, 28.56), 20: (17.82, 5.16), 25: (1.83, 1.83),
                    30: (1.64, 1.64)},
            47.57: {0: (12.07, 11.59), 5: (10.95, 10.49), 10: (5.75, 5.72),
                    15: (26.45, 10.80), 20: (4.22, 2.14), 25: (1.70, 1.70),
                    30: (1.63, 1.63)},
            76.08: {0: (2.50, 2.50), 5: (2.39, 2.39), 10: (2.01, 2.01),
                    15: (2.19, 1.99), 20: (1.65, 1.65), 25: (1.65, 1.65),
                    30: (1.63, 1.63)},
            97.73: {0: (1.66, 1.66), 5: (1.66, 1.66), 10: (1.64, 1.64),
                    15: (1.64, 1.64), 20: (1.63, 1.63), 25: (1.64, 1.64),
                    30: (1.65, 1.65)},
        },
    },
    "kimi_audio": {
        "random_drop": {
            25.67: {0: (74.81, 65.80), 5: (71.57, 64.08), 10: (92.47, 63.68),
                    15: (186.67, 60.51), 20: (251.76, 55.47), 25: (1.90, 1.90)},
            47.57: {0: (26.09, 25.53), 5: (25.39, 24.14), 10: (24.64, 22.75),
                    15: (25.80, 16.50), 20: (49.52, 15.76), 25: (1.59, 1.59)},
            76.08: {0: (4.11, 4.11), 5: (3.36, 3.36), 10: (3.21, 3.21),
                    15: (2.35, 2.35), 20: (3.97, 2.37), 25: (1.35, 1.35)},
            97.73: {0: (1.37, 1.37), 5: (1.36, 1.36), 10: (1.36, 1.36),
                    15: (1.35, 1.35), 20: (1.32, 1.32), 25: (1.32, 1.32)},
        },
        "uniform_drop": {
            25.67: {0: (66.73, 61.91), 5: (64.07, 59.58), 10: (74.69, 57.83),
                    15: (130.33, 52.55), 20: (199.48, 48.80), 25: (2.13, 1.88)},
            47.57: {0: (17.66, 17.66), 5: (20.12, 19.46), 10: (20.04, 18.96),
                    15: (15.40, 11.53), 20: (23.17, 8.76), 25: (1.45, 1.45)},
            76.08: {0: (3.11, 3.11), 5: (2.59, 2.59), 10: (2.68, 2.68),
                    15: (1.98, 1.98), 20: (1.69, 1.69), 25: (1.36, 1.36)},
            97.73: {0: (1.43, 1.43), 5: (1.34, 1.34), 10: (1.35, 1.35),
                    15: (1.32, 1.32), 20: (1.31, 1.31), 25: (1.30, 1.30)},
        },
        "uniform_merge": {
            25.67: {0: (54.32, 51.48), 5: (51.52, 50.40), 10: (50.33, 46.91),
                    15: (28.78, 22.81), 20: (8.09, 5.73), 25: (1.47, 1.47)},
            47.57: {0: (13.58, 13.58), 5: (15.24, 15.24), 10: (14.33, 13.54),
                    15: (5.41, 5.20), 20: (1.98, 1.98), 25: (1.38, 1.38)},
            76.08: {0: (1.98, 1.98), 5: (1.94, 1.94), 10: (1.90, 1.90),
                    15: (1.58, 1.58), 20: (1.40, 1.40), 25: (1.31, 1.31)},
            97.73: {0: (1.34, 1.34), 5: (1.35, 1.35), 10: (1.33, 1.33),
                    15: (1.35, 1.35), 20: (1.31, 1.31), 25: (1.32, 1.32)},
        },
    },
}

# single-layer similarity pooling sweep (omega = 3):
# tau -> layer -> (WER %, cWER %, retention %)
POOLING_SWEEP = {
    "qwen2_audio": {
        0.6: {0: (6.85, 6.51, 57.61), 5: (17.82, 17.36, 46.67),
              10: (6.03, 5.63, 52.57), 15: (38.83, 14.70, 46.52),
              20: (90.98, 18.19, 22.53), 25: (2.04, 2.04, 10.55),
              30: (1.64, 1.64, 5.18)},
        0.7: {0: (1.99, 1.99, 74.32), 5: (3.32, 3.32, 66.62),
              10: (2.09, 2.09, 70.46), 15: (3.52, 2.73, 67.23),
              20: (6.08, 2.94, 45.36), 25: (1.83, 1.83, 26.08),
              30: (1.63, 1.63, 10.51)},
        0.8: {0: (1.63, 1.63, 88.60), 5: (1.66, 1.66, 84.71),
              10: (1.66, 1.66, 86.74), 15: (1.65, 1.65, 85.92),
              20: (1.68, 1.68, 74.12), 25: (1.68, 1.68, 58.06),
              30: (1.65, 1.65, 33.89)},
        0.9: {0: (1.65, 1.65, 97.43), 5: (1.65, 1.65, 96.69),
              10: (1.64, 1.64, 97.12), 15: (1.64, 1.64, 97.14),
              20: (1.66, 1.66, 95.09), 25: (1.64, 1.64, 90.46),
              30: (1.64, 1.64, 79.43)},
    },
    "kimi_audio": {
        0.6: {0: (5.39, 5.39, 59.27), 5: (56.51, 55.91, 27.21),
              10: (30.00, 29.44, 41.27), 15: (60.93, 35.30, 34.16),
              20: (351.99, 77.06, 15.15), 25: (1.67, 1.67, 30.35)},
        0.7: {0: (1.64, 1.64, 78.35), 5: (14.68, 14.65, 48.58),
              10: (6.43, 6.43, 61.39), 15: (6.15, 5.81, 56.26),
              20: (56.22, 18.69, 37.70), 25: (1.47, 1.47, 47.80)},
        0.8: {0: (1.25, 1.25, 95.03), 5: (1.79, 1.79, 73.99),
              10: (1.50, 1.50, 82.36), 15: (1.42, 1.42, 81.85),
              20: (2.06, 1.71, 68.95), 25: (1.35, 1.35, 70.98)},
        0.9: {0: (1.29, 1.29, 99.51), 5: (1.32, 1.32, 95.73),
              10: (1.30, 1.30, 97.80), 15: (1.31, 1.31, 98.37),
              20: (1.30, 1.30, 95.48), 25: (1.28, 1.28, 92.10)},
    },
}

# fixed-budget ASR comparison at the input layer (Qwen2-Audio):
# budget K% -> method -> (KES, LSC, LSO, avg) WER %
BUDGET_ASR = {
    90: {"speedup": (7.85, 6.14, 18.45, 10.81),
         "interpolate": (3.52, 1.79, 4.34, 3.22),
         "ap_in": (3.84, 1.65, 3.79, 3.09)},
    80: {"speedup": (8.94, 6.97, 21.8, 12.57),
         "interpolate": (3.86, 1.84, 4.25, 3.32),
         "ap_in": (3.44, 1.75, 3.92, 3.04)},
    70: {"speedup": (11.92, 11.28, 32.98, 18.73),
         "interpolate": (5.34, 2.36, 4.83, 4.18),
         "ap_in": (4.04, 2.21, 4.42, 3.56)},
    60: {"speedup": (18.04, 19.85, 51.34, 29.74),
         "interpolate": (8.29, 3.98, 6.96, 6.41),
         "ap_in": (5.94, 4.38, 6.78, 5.70)},
}
