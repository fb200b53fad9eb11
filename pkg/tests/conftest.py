import pytest

from ghostpic.catalog import ModuleClass, builtin_kronecker, generate_type_a


@pytest.fixture(scope="session")
def cat_ll():
    return generate_type_a(3, "LL")


@pytest.fixture(scope="session")
def cat_lr():
    return generate_type_a(3, "LR")


@pytest.fixture(scope="session")
def cat_rl():
    return generate_type_a(3, "RL")


@pytest.fixture(scope="session")
def cat_a1():
    return generate_type_a(1, "")


@pytest.fixture(scope="session")
def kronecker():
    return builtin_kronecker()


@pytest.fixture(scope="session")
def kronecker_class(kronecker):
    return ModuleClass(kronecker, ["P1", "P2", "M"])


@pytest.fixture(scope="session")
def torsion4(cat_ll):
    """Four-brick torsion class over 1<-2<-3 with labels S1,P3,I2,S3."""
    return ModuleClass(cat_ll, ["S1", "P3", "I2", "S3"])


@pytest.fixture(scope="session")
def minimal3(cat_ll):
    """Three minimal bricks over 1<-2<-3: three minimal subobject ghosts."""
    return ModuleClass(cat_ll, ["P3", "I2", "S3"])


@pytest.fixture(scope="session")
def mixed5(cat_ll):
    return ModuleClass(cat_ll, ["S1", "P2", "I2", "P3", "S3"])


@pytest.fixture(scope="session")
def full6(cat_ll):
    return ModuleClass(cat_ll, [m.id for m in cat_ll.indecs])


@pytest.fixture(scope="session")
def case1(cat_ll):
    return ModuleClass(cat_ll, ["P2", "I2", "P3", "S2", "S3"])


@pytest.fixture(scope="session")
def case2(cat_lr):
    return ModuleClass(cat_lr, ["S1", "P2", "S2", "I3", "I1"])


@pytest.fixture(scope="session")
def case4(cat_ll):
    return ModuleClass(cat_ll, ["S2", "I2", "P3", "S3"])


@pytest.fixture(scope="session")
def case5(cat_rl):
    return ModuleClass(cat_rl, ["S3", "I2", "P1", "S1"])


@pytest.fixture(scope="session")
def a1(cat_a1):
    return ModuleClass(cat_a1, ["S1"])
