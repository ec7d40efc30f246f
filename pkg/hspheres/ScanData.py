import numpy as np


class ScanData:
    '''
    Tracks what happened at each starting height of a scan and how much of
    the scan is done.

    Attributes
    ----------
    total : int
        The number of starting heights in the scan.
    done : int
        How many have been evaluated.
    status_results : dict
        Status name to the list of starting heights that ended with it.
    tick : int
        Counts evaluations. Every 10 it resets and prints the progress.

    Methods
    -------
    __init__
        Initializes everything.
    track_record
        Records the outcome at a starting height.
    print_progress
        Prints what percentage of the scan is done.
    print_results
        Prints how many starting heights ended with each status.
    '''
    def __init__(self, total):
        self.total = total
        self.done = 0
        self.status_results = dict()
        self.tick = 0

    def track_record(self, record):
        ''' Stores the outcome of one starting height

        Parameters
        ----------
        record : ScanRecord
            The evaluated record.
        '''
        self.status_results.setdefault(record.status, []).append(record.z0)
        self.done += 1

    def print_progress(self):
        ''' Prints the progress of the scan. Only prints every 10th time this function is
            called to save time.
        '''
        self.tick += 1
        if self.tick >= 10 or self.done == self.total:
            self.tick = 0
            print("\rPercent Finished: {}%       ".format(round(100*self.done/max(self.total, 1), 2)), end='')

    def print_results(self):
        ''' Prints how many starting heights were scanned and what percent ended with each status.
        '''
        results_numbers = np.array([len(self.status_results[name]) for name in self.status_results])
        total_records = sum(results_numbers)
        statuses = [name for name in self.status_results]
        print("\nTotal heights scanned was {}".format(total_records))
        print("Statuses were {}".format(statuses))
        print("The percent with each was {}".format((100*results_numbers/max(total_records, 1)).round(4)))
