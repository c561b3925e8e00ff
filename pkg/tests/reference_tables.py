"""Published loss, job and GDP tables used as fixed reference values.

Rows are Q1..Q4 then Yearly. ``None`` marks a blank cell: a zero loss in
the loss and share tables, a value that was not printed elsewhere.
"""

SCENARIOS = ("Observed", "SARS", "MERS", "COVID-12", "COVID-L", "EUROC", "EUROC-12", "EUROC-L")

# revenue loss in US$ millions and loss share in percent, world routes
WORLD_LOSS = {
    "Observed": [3321.7, None, None, None, 3321.7],
    "SARS": [21702.6, 43307.4, 1336.4, None, 66346.4],
    "MERS": [14879, 6953.8, None, None, 21832.8],
    "COVID-12": [24187.5, 82896.5, 29464.6, None, 136548.6],
    "COVID-L": [24187.5, 89113.7, 92369.7, 68186.4, 273857.2],
    "EUROC": [23598.4, 121852, 24343.5, None, 169793.9],
    "EUROC-12": [23598.4, 121852, 51849.6, 1205.2, 198505.2],
    "EUROC-L": [23598.4, 149176.3, 82641.6, 67760.2, 323176.6],
}
WORLD_SHARE = {
    "Observed": [0.5, None, None, None, 0.5],
    "SARS": [3.1, 6.2, 0.2, None, 9.5],
    "MERS": [2.1, 1.0, None, None, 3.1],
    "COVID-12": [3.5, 11.9, 4.2, None, 19.6],
    "COVID-L": [3.5, 12.8, 13.2, 9.8, 39.2],
    "EUROC": [3.4, 17.4, 3.5, None, 24.3],
    "EUROC-12": [3.4, 17.4, 7.4, 0.2, 28.4],
    "EUROC-L": [3.4, 21.4, 11.8, 9.7, 46.3],
}
WORLD_JOBS = {
    "Observed": [0.31, None, None, None, None],
    "SARS": [2.04, 4.06, 0.13, 0.00, 6.22],
    "MERS": [1.40, 0.65, 0.00, 0.00, 2.05],
    "COVID-12": [2.27, 7.77, 2.76, 0.00, 12.81],
    "COVID-L": [2.27, 8.36, 8.66, 6.39, 25.68],
    "EUROC": [2.21, 11.43, 2.28, 0.00, 15.92],
    "EUROC-12": [2.21, 11.43, 4.86, 0.11, 18.62],
    "EUROC-L": [2.21, 13.99, 7.75, 6.35, 30.31],
}
WORLD_GDP = {
    "Observed": [12.81, None, None, None, None],
    "SARS": [83.69, 166.99, 5.15, None, 255.83],
    "MERS": [57.37, 26.81, None, None, 84.19],
    "COVID-12": [93.27, 319.65, 113.62, None, 526.53],
    "COVID-L": [93.27, 343.62, 356.18, 262.93, 1055.99],
    "EUROC": [91, 469.86, 93.87, None, 654.73],
    "EUROC-12": [91, 469.86, 199.93, 4.65, 765.44],
    "EUROC-L": [91, 575.22, 318.67, 261.28, 1246.17],
}
WORLD_ECONOMY_PCT = {
    "Observed": [0.02, None, None, None, None],
    "SARS": [0.11, 0.22, 0.01, None, 0.34],
    "MERS": [0.08, 0.04, None, None, 0.11],
    "COVID-12": [0.12, 0.43, 0.15, None, 0.70],
    "COVID-L": [0.12, 0.46, 0.48, 0.35, 1.41],
    "EUROC": [0.12, 0.63, 0.13, None, 0.88],
    "EUROC-12": [0.12, 0.63, 0.27, 0.01, 1.02],
    "EUROC-L": [0.12, 0.77, 0.43, 0.35, 1.67],
}

# intra-EU27 routes
EU_LOSS = {
    "Observed": [154.3, None, None, None, 154.3],
    "SARS": [1164.7, 2750.1, 85.7, None, 4000.4],
    "MERS": [776.9, 437.5, None, None, 1214.4],
    "COVID-12": [1297.6, 5335.3, 1890.7, None, 8523.6],
    "COVID-L": [1297.6, 5751, 5990.6, 3770.9, 16810.1],
    "EUROC": [1309.6, 7800.4, 1553.4, None, 10663.4],
    "EUROC-12": [1309.6, 7800.4, 3314.4, 79.2, 12503.5],
    "EUROC-L": [1309.6, 9627.1, 5364.7, 3747.3, 20048.8],
}
EU_SHARE = {
    "Observed": [0.4, None, None, None, 0.4],
    "SARS": [2.8, 6.6, 0.2, None, 9.6],
    "MERS": [1.9, 1.1, None, None, 2.9],
    "COVID-12": [3.1, 12.8, 4.5, None, 20.5],
    "COVID-L": [3.1, 13.8, 14.4, 9.1, 40.4],
    "EUROC": [3.1, 18.8, 3.7, None, 25.6],
    "EUROC-12": [3.1, 18.8, 8.0, 0.2, 30.1],
    "EUROC-L": [3.1, 23.2, 12.9, 9.0, 48.2],
}
EU_JOBS = {
    "Observed": [0.04, None, None, None, None],
    "SARS": [0.29, 0.69, 0.02, None, 1.00],
    "MERS": [0.19, 0.11, None, None, 0.30],
    "COVID-12": [0.32, 1.33, 0.47, None, 2.13],
    "COVID-L": [0.32, 1.43, 1.49, 0.94, 4.19],
    "EUROC": [0.33, 1.95, 0.39, None, 2.66],
    "EUROC-12": [0.33, 1.95, 0.83, 0.02, 3.12],
    "EUROC-L": [0.33, 2.40, 1.34, 0.93, 5.00],
}
EU_GDP = {
    "Observed": [2.60, None, None, None, 2.60],
    "SARS": [19.6, 46.28, 1.44, None, 67.32],
    "MERS": [13.07, 7.36, None, None, 20.44],
    "COVID-12": [21.84, 89.78, 31.82, None, 143.44],
    "COVID-L": [21.84, 96.78, 100.81, 63.46, 282.88],
    "EUROC": [22.04, 131.27, 26.14, None, 179.44],
    "EUROC-12": [22.04, 131.27, 55.77, 1.33, 210.41],
    "EUROC-L": [22.04, 162.01, 90.28, 63.06, 337.38],
}
EU_ECONOMY_PCT = {
    "Observed": [0.02, None, None, None, None],
    "SARS": [0.11, 0.27, 0.01, None, 0.39],
    "MERS": [0.08, 0.04, None, None, 0.12],
    "COVID-12": [0.13, 0.53, 0.19, None, 0.84],
    "COVID-L": [0.13, 0.57, 0.59, 0.37, 1.66],
    "EUROC": [0.13, 0.77, 0.15, None, 1.05],
    "EUROC-12": [0.13, 0.77, 0.33, 0.01, 1.23],
    "EUROC-L": [0.13, 0.95, 0.53, 0.37, 1.98],
}


def quarter_shares(table, scenario):
    """Q1..Q4 loss shares as fractions, blanks as zero."""
    return [0.0 if v is None else v / 100 for v in table[scenario][:4]]
