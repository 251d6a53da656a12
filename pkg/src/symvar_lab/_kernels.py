"""Generated by ``python -m symvar_lab._symbolic``; do not edit.

Frame-component kernels for warped 3-metrics, see ``_symbolic`` for the
derivation and argument conventions.
"""


def ricci_sphere(F0, F1, F2, F3, F4):
    x0 = -(F0*F2 + F1**2 - 1)/F0**2
    return (-2*F2/F0, x0, x0)


def scalar_jet_sphere(F0, F1, F2, F3, F4):
    x0 = F0**2
    x1 = F1**2
    x2 = F0*F2
    x3 = F0**3
    x4 = F3*x0
    x5 = 3*x1
    return (-2*(x1 + 2*x2 - 1)/x0, -4*(-F1**3 + F1 + x4)/x3, -4*(3*F1**4 - F1*x4 + F4*x3 - x2*x5 + x2 - x5)/F0**4)


def grad_z2_sphere(F0, F1, F2, F3, F4):
    x0 = F1**4
    x1 = F0**2
    x2 = (1/3)/F0**4
    x3 = x2*(F0**3*F4 - 2*F0*F1**2*F2 + x0 - 1)
    return (x2*(2*F1*F3*x1 - F2**2*x1 - x0 + 1), x3, x3)


def linearized_scalar_sphere(F0, F1, F2, F3, F4, H1_0, H1_1, H1_2, H2_0, H2_1, H2_2, H3_0, H3_1, H3_2):
    x0 = F0**(-2)
    x1 = 1/F0
    x2 = 3*F1*x1
    return (2*F1**2*H1_0*x0 + 2*F1*H1_1*x1 + 4*F2*H1_0*x1 - 2*H2_0*x0 - H2_1*x2 - H2_2 - H3_1*x2 - H3_2,)


def ricci_torus(P0, P1, P2, P3, P4, Q0, Q1, Q2, Q3, Q4):
    x0 = 1/P0
    x1 = 1/Q0
    x2 = P1*Q1
    x3 = x0*x1
    return (-P2*x0 - Q2*x1, -x3*(P2*Q0 + x2), -x3*(P0*Q2 + x2))


def scalar_jet_torus(P0, P1, P2, P3, P4, Q0, Q1, Q2, Q3, Q4):
    x0 = P1*Q1
    x1 = P0*Q2 + P2*Q0 + x0
    x2 = P0**2
    x3 = Q0**2
    x4 = P0*x1
    x5 = 2*P1
    x6 = 2*Q1
    x7 = P0*Q3 + P2*x6 + P3*Q0 + Q2*x5
    x8 = P0*x7
    return (-2*x1/(P0*Q0), 2*(P1*Q0*x1 - Q0*x8 + Q1*x4)/(x2*x3), 2*(-2*Q0*x0*x4 + Q0*x2*x6*x7 + x1*x2*(Q0*Q2 - 2*Q1**2) + x1*x3*(P0*P2 - 2*P1**2) - x2*x3*(P0*Q4 + 3*P1*Q3 + 4*P2*Q2 + 3*P3*Q1 + P4*Q0) + x3*x5*x8)/(P0**3*Q0**3))


def grad_z2_torus(P0, P1, P2, P3, P4, Q0, Q1, Q2, Q3, Q4):
    x0 = P0**(-2)
    x1 = P2**2*x0
    x2 = Q0**(-2)
    x3 = Q2**2
    x4 = x2*x3
    x5 = (2/3)*P2
    x6 = P0**(-3)
    x7 = P1**2
    x8 = x6*x7
    x9 = Q0**(-3)
    x10 = (2/3)*x9
    x11 = Q1**2
    x12 = Q2*x11
    x13 = x11*x2
    x14 = x0*x7
    x15 = x13*x14
    x16 = 1/P0
    x17 = Q1**3
    x18 = P1**3
    x19 = 1/Q0
    x20 = (1/3)*x16
    x21 = x19*x20
    x22 = P3*Q1*x21
    x23 = (1/3)*x19
    x24 = Q2*x14
    x25 = P1*Q3
    x26 = -1/3*P2*Q2*x16*x19 + x21*x25
    x27 = Q4*x19
    x28 = x12*x9
    x29 = P1*x0
    x30 = P3*x29
    x31 = P2*x29
    x32 = Q1*x2
    x33 = P1*Q2*x32
    x34 = Q1*x19
    x35 = -P1*x10*x16*x17 + x13*x16*x5 + (2/3)*x18*x34*x6 - 2/3*x19*x24
    return (P1*P2*Q1*x0*x19 + (2/3)*P1*P3*x0 + P1*Q1*Q2*x16*x2 + (1/3)*P1*x16*x17*x9 - P2*x13*x20 + (2/3)*Q1*Q3*x2 + (1/3)*Q1*x18*x19*x6 - 1/3*x1 - x10*x12 - x15 - x22 - x23*x24 - x26 - 1/3*x4 - x5*x8, (4/3)*P2*x6*x7 + (4/3)*P3*Q1*x16*x19 + (2/3)*P4*x16 + (1/3)*Q1*Q3*x2 - Q1*x23*x31 + (1/3)*x0*x11*x2*x7 - x1 - 4/3*x16*x33 + (2/3)*x2*x3 - x26 - 1/3*x27 - 1/3*x28 - 4/3*x30 - x35, P2*Q2*x21 - 1/3*P2*x8 - 1/3*P4*x16 - 4/3*Q3*x32 + (2/3)*x1 + (1/3)*x15 + (4/3)*x16*x19*x25 - x20*x33 - x22 + (2/3)*x27 + (4/3)*x28 + (1/3)*x30 - 4/3*x31*x34 + x35 - x4)


def linearized_scalar_torus(P0, P1, P2, P3, P4, Q0, Q1, Q2, Q3, Q4, H1_0, H1_1, H1_2, H2_0, H2_1, H2_2, H3_0, H3_1, H3_2):
    x0 = 1/Q0
    x1 = Q1*x0
    x2 = 1/P0
    x3 = P1*x2
    return (2*H1_0*P1*Q1*x0*x2 + 2*H1_0*P2*x2 + 2*H1_0*Q2*x0 + H1_1*P1*x2 + H1_1*Q1*x0 - H2_1*x1 - 2*H2_1*x3 - H2_2 - 2*H3_1*x1 - H3_1*x3 - H3_2,)
