"""Taylor coefficients of the Riemann-Siegel remainder kernel.

C0(p) = cos(2*pi*(p**2 - p - 1/16)) / cos(2*pi*p) is entire and even about
p = 1/2.  PSI_EVEN[k] is the coefficient of (p - 1/2)**(2k).  Generated by
exact power-series division at 120 significant digits; see
tests/test_special_fns.py::test_rs_table_matches_high_precision_division.
"""

PSI_EVEN = (
    3.8268343236508977173e-1,
    1.7489618723100817974,
    2.1180252076854963732,
    -8.7072166705114807392e-1,
    -3.4733112243465167073,
    -1.6626947308999324496,
    1.2167312889192321345,
    1.3014304161007975773,
    3.0511021827361672421e-2,
    -3.7558030515450952428e-1,
    -1.0857844165640659744e-1,
    5.1832902999549623376e-2,
    2.999948061990227592e-2,
    -2.275939670612564226e-3,
    -4.3826474165803383059e-3,
    -4.0642301837298469931e-4,
    4.0060977854221139279e-4,
    8.9710579913888412978e-5,
    -2.3025650027239107116e-5,
    -9.3800066019067924847e-6,
    6.3235149476091075042e-7,
    6.5510228192315016662e-7,
    2.2105237455526972587e-8,
    -3.322316176445628835e-8,
    -3.7349109899336560818e-9,
    1.2445067060797739195e-9,
    2.4768205376502191843e-10,
    -3.2842728168916271945e-11,
    -1.1305406852298403678e-11,
    4.5654639795886939276e-13,
    3.9598480945249215196e-13,
    7.8495662212596173171e-15,
    -1.1059043150991233194e-14,
    -7.7385439876415083171e-16,
    2.4857755550271372185e-16,
    3.051479718882721791e-17,
    -4.4142978877933028452e-18,
    -8.6313888781884147393e-19,
    5.7012921968429752176e-20,
    1.9529640164199341077e-20,
)
