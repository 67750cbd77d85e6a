"""Frozen oracle outputs; regenerate with scripts/freeze_oracles.py."""

CATALAN_ALTERNATING = 0.9159655941772387
ZETA_FIRST_ZERO_T = 14.134725141734695
CHI4_ARG_06_25 = -0.4075474578105425
MERTENS_SUM_1E6 = 2.8873280995676724
CHI7_PAIR_SUM_1E6 = (-0.023654317536773807-0.5286749292612053j)
CHI7_PAIR_VALUES_AT_3 = ((0.5000000000000001+0.8660254037844386j), (-0.4999999999999998+0.8660254037844387j))
CHI5_F_08_60 = (1.1016976673092072+0.6125077550049082j)
CHI5_F_2 = (1.3558293432119646+0j)
ZETA_MESH_MIN = 0.07619923333471908
CHI5_COUNT_051_12_0_60 = 9
CHI5_NF_T100 = [0, 1, 10, 22]
RANDOM_RECTS = [(0.722179969225875, 1.1790730246014691, 24.756162470535337, 63.957287741986654), (0.6508094971272513, 1.495844077876812, 6.298042700959918, 14.46590509574837), (0.6779230572099779, 0.8660504227724575, 47.10074524317841, 49.34460110590224), (0.614331822950892, 1.0700737405155722, 0.37037146627086237, 37.209535952705785), (1.3014341540669818, 1.4758659756522523, 26.0279724066178, 47.74578933632949), (0.714280472271675, 0.948298311421907, 22.24331197936122, 69.99662721009791), (0.721025772276628, 0.7815025542127277, 21.46922607799827, 64.57455891742866), (0.5801729663878552, 0.775382240871953, 21.136435195237482, 37.37670510602727), (0.7934551294171885, 1.3900526176511774, 38.97958888418283, 61.901354535883), (0.9733388564652626, 1.4652809061976733, 6.322745367804146, 71.85818674492356), (0.6929392078898627, 0.7527522279516832, 44.306563377613976, 72.43799232327495), (0.8779423910182599, 1.3355580606196646, 27.901806274209058, 54.53232415874521), (0.5336335662367553, 0.7360670640581801, 26.948221261460937, 55.689518678592485), (0.7830824593269757, 0.8485726717439872, 20.10749888940028, 45.60844230598123), (0.8405176588260181, 0.9313418141302015, 16.15438447534025, 40.412773676149), (0.9260971592889007, 1.0895333547377666, 32.27574928760752, 75.51542533550008), (0.5577302548594685, 0.8328130526094046, 41.514506445531424, 47.876332646722766), (0.5518721551617335, 0.7488442260248769, 0.6184607483742077, 4.340507480041937), (0.8288768086161633, 0.9129287234069585, 1.078116306150152, 68.73394822798979), (0.9623839659381608, 1.2190732490179528, 11.711553534098806, 47.126001020466894)]
RANDOM_RECT_COUNTS = [0, 0, 0, 2, 0, 0, 0, 1, 0, 0, 0, 0, 5, 0, 0, 0, 0, 0, 0, 0]
DPOLY_GOOD_FRACTION_06 = 0.2
DPOLY_GOOD_FRACTION_08 = 1.0
DPOLY_VON_MANGOLDT_06_150 = (-1.695714536071788-1.022259922841969j)
ZETA_VAR_06_1E4 = 1.549471420780245
ZETA_VAR_TAIL_06 = {(100, 1000): 0.13111314323939705, (1000, 10000.0): 0.058263276965742676, (10000.0, 100000.0): 0.02850287027309444}
PHI2_SERIES_COEF = -5.283251329308237
GAUSS_MOM_QUAD = {(2,): 0.886226925452758, (0, 0): 4.442882938158366, (4, 2): 0.3825983033931553, (2, 2, 2): 3.6167351263952807, (6,): 37.59942411946501}
FHAT_OUTSIDE_DIRECT = {1.0: 3.529856446556183e-05, 4.0: 8.825579654685778e-06, 16.0: 2.2103539248271287e-06}
