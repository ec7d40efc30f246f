import numpy as np


def rootInBracket(root, a, b):
    """Checks to see if a root is in a bracket.

    Parameters
    ----------
    root : float
        The root to check.
    a : float
        The lower end of the bracket.
    b : float
        The upper end of the bracket.
    Returns
    -------
    rootInBracket : bool
        Whether the root is in the closed bracket
    """
    return min(a, b) <= root <= max(a, b)


class RootTracker:
    '''
    Class to track the starting heights of Helfrich spheres found by the
    sphere search, along with how each was found and which brackets were lost.

    Attributes
    ----------
    roots : numpy array
        The starting heights of the spheres.
    brackets : list
        The sign-change bracket each root was refined in.
    endpoints : list
        The equator data at each root.
    methods : list
        How each root was obtained ("grid", "brentq" or "polish").
    lost_brackets : list
        (bracket, message) for brackets whose refinement failed.

    Methods
    -------
    __init__
        Initializes everything.
    add_root
        Adds a root along with its information.
    add_lost_bracket
        Records a bracket that could not be refined.
    get_polish_brackets
        Gets the brackets to run the next round of polishing on.
    '''
    def __init__(self):
        self.roots = np.zeros([0])
        self.brackets = []
        self.endpoints = []
        self.methods = []
        self.lost_brackets = []

    def __len__(self):
        return len(self.roots)

    def add_root(self, zero, bracket, endpoint, method):
        ''' Store the root that was found, along with the bracket it was found in and the method used.

        Roots already stored inside the same bracket are replaced.

        Parameters
        ----------
        zero : float
            The root to store.
        bracket : tuple
            The bracket the root was found in.
        endpoint : EndpointData
            The equator data at the root.
        method : string
            The method used to find the root
        '''
        for i, (a, b) in enumerate(self.brackets):
            if (a, b) == tuple(bracket) and rootInBracket(self.roots[i], a, b):
                self.roots[i] = zero
                self.endpoints[i] = endpoint
                self.methods[i] = method
                return
        self.roots = np.hstack([self.roots, zero])
        self.brackets.append(tuple(bracket))
        self.endpoints.append(endpoint)
        self.methods.append(method)

    def add_lost_bracket(self, bracket, message):
        self.lost_brackets.append((tuple(bracket), message))

    def get_polish_brackets(self):
        ''' Find the brackets to run the polishing on.

        Deletes the rest of the info as the refinement will be rerun on these brackets.

        returns
        -------
        polish_brackets : list
            The brackets to rerun the refinement on, in root order.
        '''
        order = np.argsort(self.roots)
        polish_brackets = [self.brackets[i] for i in order]
        self.roots = np.zeros([0])
        self.brackets = []
        self.endpoints = []
        self.methods = []
        return polish_brackets
